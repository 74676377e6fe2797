#pragma once

#include "ruin/asymptotics.hpp"
#include "ruin/core.hpp"
#include "ruin/exact.hpp"
#include "ruin/hypergeom.hpp"
#include "ruin/moments.hpp"
#include "ruin/oracles.hpp"
#include "ruin/report.hpp"
#include "ruin/validate.hpp"
