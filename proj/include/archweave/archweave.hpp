#pragma once

#include "archweave/error.hpp"
#include "archweave/name_spec.hpp"
#include "archweave/rule.hpp"
#include "archweave/catalog.hpp"
#include "archweave/model.hpp"
#include "archweave/model_io.hpp"
#include "archweave/change_set.hpp"
#include "archweave/pattern.hpp"
#include "archweave/engine.hpp"
#include "archweave/consistency.hpp"
#include "archweave/json_io.hpp"
#include "archweave/plantuml.hpp"
