#pragma once

#include "dseq/crypto_events.hpp"
#include "dseq/dseq_core.hpp"
#include "dseq/error.hpp"
#include "dseq/modular.hpp"
#include "dseq/prime_engine.hpp"
#include "dseq/report_io.hpp"
#include "dseq/scan.hpp"
