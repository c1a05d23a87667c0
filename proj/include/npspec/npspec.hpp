#pragma once

#include "npspec/errors.hpp"
#include "npspec/geometry.hpp"
#include "npspec/gpt.hpp"
#include "npspec/inverse_scan.hpp"
#include "npspec/io.hpp"
#include "npspec/material.hpp"
#include "npspec/np_analytic.hpp"
#include "npspec/np_numeric.hpp"
#include "npspec/twodisks.hpp"
