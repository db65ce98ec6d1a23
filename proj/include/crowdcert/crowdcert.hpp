#pragma once

#include "crowdcert/aggregate.hpp"
#include "crowdcert/certify.hpp"
#include "crowdcert/core.hpp"
#include "crowdcert/error.hpp"
#include "crowdcert/estimate.hpp"
#include "crowdcert/exact.hpp"
#include "crowdcert/io.hpp"
#include "crowdcert/rng.hpp"
#include "crowdcert/simulate.hpp"
