#pragma once

// Convenience include for the whole library.

#include "core.hpp"
#include "design.hpp"
#include "errors.hpp"
#include "galton.hpp"
#include "inference.hpp"
#include "rng.hpp"
#include "scenario.hpp"
#include "selection.hpp"
