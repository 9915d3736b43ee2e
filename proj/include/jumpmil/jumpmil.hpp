#pragma once

// Umbrella header: strong approximation of jump-diffusion SDEs driven by a
// Wiener process and a nonhomogeneous Poisson process, under the jump
// commutativity condition. Model contracts, path simulation, conditional and
// linear Milstein global approximations, density-generated meshes and the
// Monte-Carlo error laboratory.

#include "config.hpp"
#include "errorlab.hpp"
#include "errors.hpp"
#include "mesh.hpp"
#include "meshdesign.hpp"
#include "model.hpp"
#include "path.hpp"
#include "quad.hpp"
#include "rng.hpp"
#include "scheme.hpp"
#include "util.hpp"
