#pragma once

// Umbrella header.

#include "smile/asymptotics.hpp"
#include "smile/blackscholes.hpp"
#include "smile/config.hpp"
#include "smile/errors.hpp"
#include "smile/harness.hpp"
#include "smile/models.hpp"
#include "smile/pricing.hpp"
#include "smile/quad.hpp"
#include "smile/quote.hpp"
#include "smile/specfun.hpp"
#include "smile/stable.hpp"
#include "smile/tail.hpp"
