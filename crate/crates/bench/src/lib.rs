//! Workloads for the pipeline benchmarks.

/// `lights` independent traffic lights, each pushed at state 1.
pub fn traffic_lights(lights: usize) -> String {
    let mut p = String::from(
        "red(L) :- not green(L), light(L).\n\
         &next(&eventually(green(L))) :- push(L).\n\
         &next(push(L)) :- &initial, light(L).\n",
    );
    for i in 1..=lights {
        p.push_str(&format!("light(l{i}).\n"));
    }
    p
}

/// The metric variant: green within `[lo, hi)` time units after the push.
pub fn metric_traffic_lights(lights: usize, lo: i64, hi: i64) -> String {
    traffic_lights(lights).replace("&eventually(green(L))", &format!("&eventually(&i({lo},{hi}),green(L))"))
}

/// Strict alternation of green and red from the first state.
pub const ALTERNATION: &str = "{ green(l1) ; red(l1) }.\n\
    :- not &eventually(&star(&seq(green(l1),red(l1))),&final), &initial.\n";
