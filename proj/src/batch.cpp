#include "treexplain/batch.hpp"

#include <algorithm>
#include <exception>
#include <string>
#include <thread>

#include "treexplain/oracle.hpp"
#include "treexplain/treeshap.hpp"

namespace treexplain {

unsigned resolve_threads(unsigned threads) {
  if (threads != 0) return threads;
  return std::max(1U, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t, std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(count, 1));
  if (workers <= 1) {
    fn(0, count);
    return;
  }
  const std::size_t chunk = (count + workers - 1) / workers;
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = std::min(count, w * chunk);
    const std::size_t end = std::min(count, begin + chunk);
    pool.emplace_back([&, w, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

namespace {

void CheckWidth(const TreeEnsemble& ensemble, const Dataset& data) {
  if (!data.empty() && data.cols() != static_cast<std::size_t>(ensemble.num_features())) {
    throw Error(ErrorKind::kDimensionMismatch,
                "row 0: input has " + std::to_string(data.cols()) + " features, model expects " +
                    std::to_string(ensemble.num_features()));
  }
}

template <typename Fn>
auto WithRow(std::size_t r, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), "row " + std::to_string(r) + ": " + e.what());
  }
}

}  // namespace

std::vector<Attribution> batch_explain(const TreeEnsemble& ensemble, const Dataset& data,
                                       AttributionMethod method, unsigned threads) {
  CheckWidth(ensemble, data);
  if (!is_individualized(method)) {
    throw Error(ErrorKind::kInvalidArgument,
                std::string(attribution_method_name(method)) + " is not a per-row method");
  }
  std::vector<Attribution> out(data.rows());
  parallel_for(data.rows(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      out[r] = WithRow(r, [&] {
        switch (method) {
          case AttributionMethod::kSaabas: return saabas(ensemble, data.row(r));
          case AttributionMethod::kBrute: return brute_shap(ensemble, data.row(r));
          default: return ensemble_shap(ensemble, data.row(r));
        }
      });
    }
  });
  return out;
}

std::vector<InteractionMatrix> batch_interactions(const TreeEnsemble& ensemble,
                                                  const Dataset& data, unsigned threads) {
  CheckWidth(ensemble, data);
  std::vector<InteractionMatrix> out(data.rows());
  parallel_for(data.rows(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      out[r] = WithRow(r, [&] { return shap_interactions(ensemble, data.row(r)); });
    }
  });
  return out;
}

}  // namespace treexplain
