#ifndef HAMLAB_HAMLAB_HPP
#define HAMLAB_HAMLAB_HPP

// Umbrella header.

#include "hamlab/error.hpp"
#include "hamlab/rational.hpp"
#include "hamlab/digraph.hpp"
#include "hamlab/partition.hpp"
#include "hamlab/io.hpp"
#include "hamlab/conditions.hpp"
#include "hamlab/matching.hpp"
#include "hamlab/hamilton.hpp"
#include "hamlab/cycle_cover.hpp"
#include "hamlab/regular_pairs.hpp"
#include "hamlab/blowup.hpp"
#include "hamlab/shifted_walks.hpp"
#include "hamlab/assembly.hpp"
#include "hamlab/lab.hpp"

#endif  // HAMLAB_HAMLAB_HPP
