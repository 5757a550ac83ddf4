#include "icm/valuation.hpp"

namespace icm {

Valuation value_stacks(const StackDistribution& stacks, const PayoutLadder& payouts,
                       const ExactConfig& exact_cfg, const McConfig& mc_cfg, EquityMethod method) {
    const bool use_exact = method == EquityMethod::exact ||
                           (method == EquityMethod::automatic &&
                            stacks.player_count() <= exact_cfg.max_players_exact);
    if (use_exact) return {icm_equity(stacks, payouts, exact_cfg), false, 0};
    auto mc = icm_equity_mc(stacks, payouts, mc_cfg);
    return {std::move(mc.equity), true, mc.simulations};
}

}  // namespace icm
