#include "sqlreward/enrich/batch.hpp"

#include <map>

#include "sqlreward/errors.hpp"
#include "sqlreward/parallel.hpp"

namespace sqlreward::enrich {

std::vector<ReferencePool> enrich_dataset(const std::vector<io::DatasetItem>& dataset,
                                          const std::vector<io::CandidateRow>& candidates,
                                          const std::filesystem::path& db_root, const EnrichOptions& options,
                                          const exec::Executor& executor) {
  std::map<std::string, std::vector<std::string>> by_question;
  for (const auto& c : candidates) by_question[c.question_id].push_back(c.sql);

  std::vector<ReferencePool> pools(dataset.size());
  parallel_for(dataset.size(), options.threads, [&](std::size_t i) {
    const auto& item = dataset[i];
    const auto db = exec::resolve_db(db_root, item.db_id);
    static const std::vector<std::string> kNone;
    auto it = by_question.find(item.question_id);
    try {
      pools[i] = build_reference_pool(item.sql, it == by_question.end() ? kNone : it->second, db, options.timeout_ms,
                                      executor, options.match_mode);
    } catch (const GoldExecutionFailed& e) {
      throw GoldExecutionFailed("question " + item.question_id + ": " + e.what());
    }
    pools[i].question_id = item.question_id;
    pools[i].db_id = item.db_id;
  });
  return pools;
}

}  // namespace sqlreward::enrich
