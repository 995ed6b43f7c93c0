// Convenience umbrella header.

#pragma once

#include "tiltquad/allocation.hpp"
#include "tiltquad/config.hpp"
#include "tiltquad/control.hpp"
#include "tiltquad/geometry.hpp"
#include "tiltquad/mission.hpp"
#include "tiltquad/simrunner.hpp"
#include "tiltquad/telemetry.hpp"
#include "tiltquad/types.hpp"
#include "tiltquad/vehicle.hpp"
#include "tiltquad/verify.hpp"
