#pragma once

#include "svote/errors.hpp"
#include "svote/field.hpp"
#include "svote/random.hpp"
#include "svote/sharing.hpp"
#include "svote/rules.hpp"
#include "svote/election_io.hpp"
#include "svote/wire.hpp"
#include "svote/transport.hpp"
#include "svote/tcp.hpp"
#include "svote/transcript.hpp"
#include "svote/engine.hpp"
#include "svote/comparison.hpp"
#include "svote/validation.hpp"
#include "svote/cluster.hpp"
#include "svote/protocol.hpp"
#include "svote/generate.hpp"
#include "svote/bench.hpp"
