#pragma once

// Umbrella header for the whole toolkit.

#include "ripcert/construction.hpp"
#include "ripcert/errors.hpp"
#include "ripcert/generate.hpp"
#include "ripcert/matrix.hpp"
#include "ripcert/prng.hpp"
#include "ripcert/rational.hpp"
#include "ripcert/reduction.hpp"
#include "ripcert/rip.hpp"
#include "ripcert/sat.hpp"
#include "ripcert/spectral.hpp"
#include "ripcert/subsets.hpp"
#include "ripcert/transforms.hpp"
#include "ripcert/verify.hpp"
