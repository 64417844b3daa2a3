#pragma once

#include "hjnet/arc_solver.hpp"
#include "hjnet/aubry.hpp"
#include "hjnet/discrete.hpp"
#include "hjnet/eikonal.hpp"
#include "hjnet/error.hpp"
#include "hjnet/extension.hpp"
#include "hjnet/graph.hpp"
#include "hjnet/hamiltonian.hpp"
#include "hjnet/network.hpp"
#include "hjnet/sl_oracle.hpp"
