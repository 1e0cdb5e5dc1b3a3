#pragma once

#include "ecodec/ecosystem.hpp"
#include "ecodec/errors.hpp"
#include "ecodec/evolution.hpp"
#include "ecodec/export.hpp"
#include "ecodec/gene_model.hpp"
#include "ecodec/habitat.hpp"
#include "ecodec/habitat_ops.hpp"
#include "ecodec/ids.hpp"
#include "ecodec/metrics.hpp"
#include "ecodec/oracle.hpp"
#include "ecodec/rng.hpp"
#include "ecodec/scenario.hpp"
#include "ecodec/simulation.hpp"
#include "ecodec/snapshot.hpp"
#include "ecodec/world.hpp"
