#pragma once

#include "lmfmm/bessel.hpp"
#include "lmfmm/csv.hpp"
#include "lmfmm/expansions.hpp"
#include "lmfmm/fmm.hpp"
#include "lmfmm/geometry.hpp"
#include "lmfmm/greens.hpp"
#include "lmfmm/parallel.hpp"
#include "lmfmm/quadrature.hpp"
#include "lmfmm/sommerfeld.hpp"
#include "lmfmm/spectral.hpp"
#include "lmfmm/translations.hpp"
#include "lmfmm/tree.hpp"
#include "lmfmm/validation.hpp"
