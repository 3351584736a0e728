#pragma once

#include "twofield/analysis.hpp"
#include "twofield/assembly.hpp"
#include "twofield/linalg.hpp"
#include "twofield/mesh.hpp"
#include "twofield/problems.hpp"
#include "twofield/quadrature.hpp"
#include "twofield/space.hpp"
#include "twofield/study.hpp"
#include "twofield/vtk.hpp"
