#pragma once

#include "mmfuse/composition.hpp"
#include "mmfuse/embeddings.hpp"
#include "mmfuse/errors.hpp"
#include "mmfuse/evaluation.hpp"
#include "mmfuse/numerics.hpp"
#include "mmfuse/report.hpp"
#include "mmfuse/search.hpp"
