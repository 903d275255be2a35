#pragma once

#include "geosugg/concept_set.hpp"
#include "geosugg/config.hpp"
#include "geosugg/cooccurrence.hpp"
#include "geosugg/errors.hpp"
#include "geosugg/evaluation.hpp"
#include "geosugg/io.hpp"
#include "geosugg/log_pipeline.hpp"
#include "geosugg/matching.hpp"
#include "geosugg/ontology.hpp"
#include "geosugg/parallel.hpp"
#include "geosugg/pipeline.hpp"
#include "geosugg/suggestion.hpp"
#include "geosugg/text.hpp"
