#pragma once

#include "leasim/domain.hpp"
#include "leasim/energy.hpp"
#include "leasim/engine.hpp"
#include "leasim/mapper.hpp"
#include "leasim/policy.hpp"
#include "leasim/report.hpp"
#include "leasim/trace.hpp"
