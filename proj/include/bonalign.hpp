#pragma once

#include "bonalign/best_of_n.hpp"
#include "bonalign/bon_oracle.hpp"
#include "bonalign/distribution.hpp"
#include "bonalign/error.hpp"
#include "bonalign/ldp.hpp"
#include "bonalign/metrics.hpp"
#include "bonalign/numeric.hpp"
#include "bonalign/random.hpp"
#include "bonalign/tilt.hpp"
