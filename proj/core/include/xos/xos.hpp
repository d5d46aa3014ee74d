#pragma once

#include "xos/equilibrium.hpp"
#include "xos/errors.hpp"
#include "xos/liabilities.hpp"
#include "xos/metrics.hpp"
#include "xos/ownership.hpp"
#include "xos/pricing.hpp"
#include "xos/system.hpp"
