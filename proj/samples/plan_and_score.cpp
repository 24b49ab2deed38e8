// Replays the Barcelona trip query against its device and scores a predicted plan.

#include <iostream>

#include "camphor/data/fixtures.hpp"
#include "camphor/eval/metrics.hpp"

int main() {
    using namespace camphor;
    const ToolCatalog& catalog = default_catalog();
    DeviceState device = fixtures::barcelona_state(catalog);
    Trajectory gold = fixtures::barcelona_trajectory(device, catalog, "q001", "test");

    ScriptedOracle oracle({gold});
    Trajectory replay = run_episode(oracle, device, catalog, {gold.query_id, gold.split, gold.query, gold.device_state});
    std::cout << history_of(replay).render() << "\n\n";

    auto pred = parse_call_list(
        "[create_calendar_event(event_title='Flight to Barcelona, departs Dublin 7:00 AM', time='2024-01-07T07:00:00'); "
        "send_mail(receiver='alice@example.com', content='Flight booked')]");
    MatchContext ctx{&catalog};
    PlanComparison c = compare_plans(gold.final_plan, pred, ctx);
    std::cout << "tool F1  " << c.tool_f1() << "\n"
              << "delex F1 " << c.delex_f1() << "\n"
              << "plan F1  " << c.plan_f1() << "\n";
    for (const auto& m : c.matching) std::cout << "pred " << m.pred << " ~ gold " << m.gold << " (" << to_id(m.level) << ")\n";
}
