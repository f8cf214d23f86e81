#pragma once

#include "gktab/bounds.hpp"
#include "gktab/evaluator.hpp"
#include "gktab/io.hpp"
#include "gktab/kernel.hpp"
#include "gktab/matfill.hpp"
#include "gktab/mesh.hpp"
#include "gktab/quadrature.hpp"
#include "gktab/sampling.hpp"
#include "gktab/table.hpp"
