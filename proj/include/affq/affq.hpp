#ifndef AFFQ_AFFQ_HPP
#define AFFQ_AFFQ_HPP

#include "affq/averaging.hpp"
#include "affq/basis.hpp"
#include "affq/body.hpp"
#include "affq/body_spec.hpp"
#include "affq/csv.hpp"
#include "affq/equilibria.hpp"
#include "affq/error.hpp"
#include "affq/isoperimetric.hpp"
#include "affq/jet.hpp"
#include "affq/linalg.hpp"
#include "affq/shape.hpp"
#include "affq/sphere_grid.hpp"
#include "affq/zoo.hpp"

#endif  // AFFQ_AFFQ_HPP
