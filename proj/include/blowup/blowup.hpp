#pragma once

#include "blowup/contraction.hpp"
#include "blowup/equivalence.hpp"
#include "blowup/error.hpp"
#include "blowup/model.hpp"
#include "blowup/tensor.hpp"
