// Generates a small synthetic dataset, trains a model for a few epochs and
// compares it with Kaplan-Meier on held-out data.

#include <iostream>

#include "drsa/drsa.hpp"

int main() {
  const auto cfg = drsa::default_synthetic_config(/*feature_dim=*/8, /*num_intervals=*/12,
                                                  /*num_samples=*/3000, /*censor_target=*/0.3,
                                                  /*seed=*/1);
  const auto syn = drsa::synthesize(cfg);
  const auto [pool, test] = drsa::split(syn.dataset, 0.8, 1);
  const auto [train, val] = drsa::split(pool, 0.9, 2);

  drsa::TrainConfig tc;
  tc.max_epochs = 5;
  tc.d_emb = 8;
  tc.d_hid = 16;
  tc.learning_rate = 5e-3;
  tc.batch_size = 64;
  const auto result = drsa::train(train, val, tc, [](const drsa::EpochRecord& r) {
    std::cout << "epoch " << r.epoch << "  loss " << r.train.total << "  val C-index "
              << r.val_c_index << "\n";
  });

  const auto curves = drsa::predict_curves(result.params, test);
  const auto km = drsa::km_fit(train);
  drsa::CurveMatrix km_w, km_p;
  for (const auto& s : test.samples()) {
    const auto c = drsa::km_predict(km, s);
    km_w.push_back(c.event_rate);
    km_p.push_back(c.event_prob);
  }
  std::cout << "DRSA  C-index " << drsa::c_index(drsa::event_rate_matrix(curves), test)
            << "  ANLP " << drsa::anlp(drsa::event_prob_matrix(curves), test) << "\n"
            << "KM    C-index " << drsa::c_index(km_w, test) << "  ANLP "
            << drsa::anlp(km_p, test) << "\n";
}
