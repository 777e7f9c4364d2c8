#pragma once

#include "grasspinch/linalg.hpp"
#include "grasspinch/jet.hpp"
#include "grasspinch/taylor.hpp"
#include "grasspinch/polynomial.hpp"
#include "grasspinch/grassmannian.hpp"
#include "grasspinch/immersion.hpp"
#include "grasspinch/catalog.hpp"
#include "grasspinch/submanifold.hpp"
#include "grasspinch/sampling.hpp"
#include "grasspinch/flatness.hpp"
#include "grasspinch/pinching.hpp"
#include "grasspinch/identities.hpp"
#include "grasspinch/integration.hpp"
#include "grasspinch/report.hpp"
