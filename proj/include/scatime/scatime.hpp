#pragma once

#include "scatime/errors.hpp"
#include "scatime/kinematics.hpp"
#include "scatime/specfun.hpp"
#include "scatime/partialwave.hpp"
#include "scatime/hardsphere.hpp"
#include "scatime/onedim.hpp"
#include "scatime/arrival.hpp"
#include "scatime/wkb.hpp"
