"""Tour of the analytic bounds, from derivatives to guaranteed intervals.

The running example is the two-root agreement network (X, Y independent
and binary, E observes whether they agree): conditioning on agreement
makes the query Pr(y | e) exactly as sensitive to the prior of X as any
query can ever be, so the network-independent derivative bound is met
with equality there.
"""

from belief_tuner import (Event, MetaParameterRef, agreement_network,
                          analytic_query_derivative, apply_change,
                          derivative_bound, exact_root_change, fire_alarm,
                          log_odds_distance, param_change_lower_bound,
                          posterior, query_interval, sensitivity_factor)

X_TRUE = MetaParameterRef.make("X", "true")
AGREE = {"E": "true"}
Y_TRUE = Event("Y", "true")


def derivative_story():
    print("1. The derivative of a query in a parameter is bounded by")
    print("   q(1-q)/(p(1-p)); on the agreement network the bound is met:")
    for theta_x in (0.1, 0.3, 0.5):
        net = agreement_network(theta_x, 0.7)
        d = analytic_query_derivative(net, Y_TRUE, AGREE, X_TRUE)
        q = posterior(net, Y_TRUE, AGREE)
        print(f"   theta_x={theta_x:.1f}: derivative {d:8.4f}"
              f"  bound {derivative_bound(q, theta_x):8.4f}")
    print("   As theta_x approaches 0 the bound blows up: extreme")
    print("   parameters with non-extreme queries are the fragile case.")
    print()


def relative_change_story():
    print("2. Relative changes are tamer: for tau <= 1/2 an infinitesimal")
    print("   relative change in tau moves the query's relative value by")
    print(f"   at most a factor {sensitivity_factor(0.0, 0.5):.0f}."
          "  Finite changes can exceed it:")
    net = agreement_network(0.5, 0.01)
    before = posterior(net, Y_TRUE, AGREE)
    after = posterior(apply_change(net, X_TRUE, 0.6), Y_TRUE, AGREE)
    print(f"   tau .5 -> .6 (20% up) moves the query {before:.4f} ->"
          f" {after:.4f} ({100 * (after - before) / before:.0f}% up)")
    print()


def log_odds_story():
    print("3. Measured in log-odds, query changes never exceed parameter")
    print("   changes. Raising the tampering prior .02 -> .0365 is a")
    budget = log_odds_distance(0.02, 0.0365)
    print(f"   log-odds move of {budget:.3f}, so every other posterior is")
    print("   confined to a guaranteed band around its current value:")
    net = fire_alarm()
    evidence = {"report": "true", "smoke": "false"}
    fire = Event("fire", "true")
    q_fire = posterior(net, fire, evidence)
    band = query_interval(q_fire, budget)
    changed = apply_change(net, MetaParameterRef.make("tampering", "true"),
                           0.0365)
    exact = posterior(changed, fire, evidence)
    print(f"   P(fire | e): now {q_fire:.4f}, guaranteed"
          f" [{band.low:.4f}, {band.high:.4f}], exact after the change"
          f" {exact:.4f}")
    assert band.contains(exact)
    print()


def shortcut_story():
    print("4. Two constant-time shortcuts fall out of the same identity:")
    budget, p_low = param_change_lower_bound(0.25, 0.50, 0.01)
    print(f"   - moving a query .25 -> .50 needs at least ln(3) ="
          f" {budget:.4f} of log-odds; a parameter at .01 must move to at")
    print(f"     least {p_low:.4f} (the exact requirement is .03)")
    p_new = exact_root_change(0.02, 0.50, 0.65)
    print(f"   - for a root queried directly, the required prior is exact:")
    print(f"     tampering .02 with posterior .50 needs {p_new:.4f}"
          f" for posterior .65")
    net = fire_alarm()
    changed = apply_change(net, MetaParameterRef.make("tampering", "true"),
                           p_new)
    check = posterior(changed, Event("tampering", "true"),
                      {"report": "true", "smoke": "false"})
    print(f"     re-inference confirms: {check:.4f}")
    print()


def main():
    derivative_story()
    relative_change_story()
    log_odds_story()
    shortcut_story()
    print("The moral: absolute distinctions between small probabilities")
    print("(.02 vs .036) can matter a lot, while the same distinctions in")
    print("log-odds terms are honest about how far queries can travel.")


if __name__ == "__main__":
    main()
