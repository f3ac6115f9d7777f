#pragma once

#include "stardisc/error.hpp"
#include "stardisc/random.hpp"
#include "stardisc/sequence.hpp"
#include "stardisc/discrepancy.hpp"
#include "stardisc/estimator.hpp"
#include "stardisc/operators.hpp"
#include "stardisc/optimizer.hpp"
#include "stardisc/inverse.hpp"
#include "stardisc/io.hpp"
