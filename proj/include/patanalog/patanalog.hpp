#pragma once

#include "patanalog/clp.hpp"
#include "patanalog/coordinator.hpp"
#include "patanalog/error.hpp"
#include "patanalog/http_api.hpp"
#include "patanalog/ingest.hpp"
#include "patanalog/patent_search.hpp"
#include "patanalog/store.hpp"
#include "patanalog/trainer.hpp"
#include "patanalog/unicode.hpp"
#include "patanalog/vectors.hpp"
#include "patanalog/workstation.hpp"
