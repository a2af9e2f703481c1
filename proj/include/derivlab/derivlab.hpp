#pragma once

#include "derivlab/commutant.hpp"
#include "derivlab/derivation.hpp"
#include "derivlab/error.hpp"
#include "derivlab/experiment.hpp"
#include "derivlab/gns.hpp"
#include "derivlab/heisenberg.hpp"
#include "derivlab/matrix_io.hpp"
#include "derivlab/numlin.hpp"
#include "derivlab/random.hpp"
#include "derivlab/report.hpp"
#include "derivlab/spectral.hpp"
#include "derivlab/subspace.hpp"
