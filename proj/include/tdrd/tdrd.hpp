#pragma once

#include "tdrd/certificate.hpp"
#include "tdrd/config.hpp"
#include "tdrd/errors.hpp"
#include "tdrd/expression.hpp"
#include "tdrd/hpoly.hpp"
#include "tdrd/linalg.hpp"
#include "tdrd/reaction.hpp"
#include "tdrd/regions.hpp"
#include "tdrd/simulator.hpp"
#include "tdrd/spectral.hpp"
#include "tdrd/transform.hpp"
