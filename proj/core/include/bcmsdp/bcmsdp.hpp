#pragma once

#include "bcmsdp/bcm.hpp"
#include "bcmsdp/certify.hpp"
#include "bcmsdp/error.hpp"
#include "bcmsdp/escape.hpp"
#include "bcmsdp/gradient_cache.hpp"
#include "bcmsdp/lanczos.hpp"
#include "bcmsdp/manifold.hpp"
#include "bcmsdp/point.hpp"
#include "bcmsdp/point_io.hpp"
#include "bcmsdp/problem.hpp"
#include "bcmsdp/trace.hpp"
