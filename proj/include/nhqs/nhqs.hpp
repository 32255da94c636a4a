#ifndef NHQS_NHQS_HPP
#define NHQS_NHQS_HPP

#include "nhqs/commands.hpp"
#include "nhqs/dynamics.hpp"
#include "nhqs/errors.hpp"
#include "nhqs/expression.hpp"
#include "nhqs/linalg.hpp"
#include "nhqs/potential.hpp"
#include "nhqs/report.hpp"
#include "nhqs/run_config.hpp"
#include "nhqs/scattering.hpp"
#include "nhqs/transfer.hpp"
#include "nhqs/verify.hpp"

#endif  // NHQS_NHQS_HPP
