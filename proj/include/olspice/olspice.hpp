#pragma once

#include "core.hpp"
#include "harness.hpp"
#include "io.hpp"
#include "lasso.hpp"
#include "oracle.hpp"
#include "rls.hpp"
#include "scalar.hpp"
#include "scenarios.hpp"
#include "spice.hpp"
