#pragma once

#include "zetachain/error.hpp"
#include "zetachain/hypgeo.hpp"
#include "zetachain/schemes.hpp"
#include "zetachain/parallel.hpp"
#include "zetachain/symdyn.hpp"
#include "zetachain/zeta.hpp"
#include "zetachain/roots.hpp"
#include "zetachain/chains.hpp"
#include "zetachain/io.hpp"
