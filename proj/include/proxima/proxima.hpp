#pragma once

#include "proxima/asymptotics.hpp"
#include "proxima/case_number.hpp"
#include "proxima/convolution.hpp"
#include "proxima/distribution.hpp"
#include "proxima/distribution_io.hpp"
#include "proxima/error.hpp"
#include "proxima/gradient_model.hpp"
#include "proxima/heightmap.hpp"
#include "proxima/interaction.hpp"
#include "proxima/synthesis.hpp"
