#pragma once

#include "bonalign/experiments/cli.hpp"
#include "bonalign/experiments/common.hpp"
#include "bonalign/experiments/config.hpp"
#include "bonalign/experiments/example1.hpp"
#include "bonalign/experiments/ldp_probe.hpp"
#include "bonalign/experiments/report.hpp"
#include "bonalign/experiments/scans.hpp"
#include "bonalign/experiments/ternary.hpp"
