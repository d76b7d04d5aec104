#pragma once

#include "upblab/atoms.hpp"
#include "upblab/canonical.hpp"
#include "upblab/gupb.hpp"
#include "upblab/harness.hpp"
#include "upblab/json_io.hpp"
#include "upblab/linalg.hpp"
#include "upblab/rng.hpp"
#include "upblab/segre.hpp"
#include "upblab/signtables.hpp"
#include "upblab/states.hpp"
