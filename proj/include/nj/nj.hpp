#pragma once

#include "brackets.hpp"
#include "config.hpp"
#include "errors.hpp"
#include "expr.hpp"
#include "field.hpp"
#include "fields.hpp"
#include "flows.hpp"
#include "hj.hpp"
#include "jet.hpp"
#include "linalg.hpp"
#include "riccati.hpp"
#include "rng.hpp"
#include "wedge.hpp"
