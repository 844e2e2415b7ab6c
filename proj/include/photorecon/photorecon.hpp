#pragma once

#include "photorecon/detector_model.hpp"
#include "photorecon/direct_inversion.hpp"
#include "photorecon/error.hpp"
#include "photorecon/experiment.hpp"
#include "photorecon/io.hpp"
#include "photorecon/landweber.hpp"
#include "photorecon/metrics.hpp"
#include "photorecon/sampling.hpp"
#include "photorecon/signed_log.hpp"
#include "photorecon/special_functions.hpp"
#include "photorecon/states.hpp"
#include "photorecon/version.hpp"
