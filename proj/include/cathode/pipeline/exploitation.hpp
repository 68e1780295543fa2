#pragma once

#include <string>
#include <vector>

#include "cathode/pipeline/session.hpp"

namespace cathode {

// Deduplicates the exploration output and commits dedup_completed.
// Throws InvalidPhase unless the exploration is closed and not yet deduped.
DedupResult run_dedup(Session& session);

struct OperatorVerdict {
  Formula first;
  Formula second;
  Formula winner;
  std::string note;
};

// Records manual comparison verdicts (operator_verdict events); they seed
// the comparator cache. Throws InvalidArgument when a winner is not part of
// its pair.
void record_operator_verdicts(Session& session, const std::vector<OperatorVerdict>& verdicts);

// Ranks the dedup survivors and commits rank_completed. Unknown valences
// commit candidate_excluded; every backend call and fresh verdict is logged.
// On a comparator failure rank_failed is committed (with the partial
// outcome) and RankingInterrupted rethrown. Throws InvalidPhase before dedup.
RankOutcome run_rank(Session& session, LlmBackend& backend,
                     const ValenceTable& valences = ValenceTable::standard());

}  // namespace cathode
