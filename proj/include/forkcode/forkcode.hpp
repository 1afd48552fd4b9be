#pragma once

// Umbrella header for the fork-network coding toolkit.

#include "forkcode/binning_codec.hpp"
#include "forkcode/bits.hpp"
#include "forkcode/compression.hpp"
#include "forkcode/errors.hpp"
#include "forkcode/fingerprint.hpp"
#include "forkcode/fork_construct.hpp"
#include "forkcode/fork_sim.hpp"
#include "forkcode/gf2.hpp"
#include "forkcode/linear_hash.hpp"
#include "forkcode/prng.hpp"
#include "forkcode/rate_region.hpp"
#include "forkcode/relation.hpp"
#include "forkcode/serialization.hpp"
#include "forkcode/source_model.hpp"
