use criterion::{criterion_group, criterion_main, Criterion};
use exactber::{
    closure, parse_generator, pb_series_coeffs, realize, simulate, solve, trellis, Bsc,
    ClosureCaps, F64Ring, Form, NoisyChannel, RatFnRing, SimConfig, StepChannel,
};

fn setup(gen: &str, form: Form) -> (exactber::EncoderFsm, exactber::Trellis, Bsc) {
    let fsm = realize(&parse_generator(gen).unwrap(), form).unwrap();
    let tr = trellis(&fsm);
    let ch = Bsc::new(tr.c);
    (fsm, tr, ch)
}

fn bench_closure(c: &mut Criterion) {
    let mut g = c.benchmark_group("closure");
    for (name, gen) in [
        ("memory2", "5,7"),
        ("memory3", "[[1+D^2+D^3,1+D+D^2+D^3]]"),
        ("rate23-8state", "[[1+D,D,1],[D^2,1,1+D+D^2]]"),
    ] {
        let (_, tr, ch) = setup(gen, Form::Controller);
        g.bench_function(name, |b| {
            b.iter(|| {
                let caps = ClosureCaps::default_for(tr.c, ch.metric_range());
                closure(&tr, &ch, caps).unwrap().m()
            })
        });
    }
    g.finish();
}

fn bench_solve(c: &mut Criterion) {
    let mut g = c.benchmark_group("solve");
    {
        let (_, tr, ch) = setup("1,3", Form::Controller);
        let caps = ClosureCaps::default_for(tr.c, ch.metric_range());
        let graph = closure(&tr, &ch, caps).unwrap();
        g.bench_function("exact-memory1", |b| {
            b.iter(|| solve(&RatFnRing, &graph, &ch, tr.b).unwrap().pb)
        });
    }
    {
        let (_, tr, ch) = setup("5,7", Form::Controller);
        let caps = ClosureCaps::default_for(tr.c, ch.metric_range());
        let graph = closure(&tr, &ch, caps).unwrap();
        g.bench_function("series5-memory2", |b| {
            b.iter(|| pb_series_coeffs(&graph, &ch, tr.b, 5).unwrap())
        });
        g.bench_function("numeric-memory2", |b| {
            b.iter(|| solve(&F64Ring::new(0.03), &graph, &ch, tr.b).unwrap().pb)
        });
    }
    g.finish();
}

fn bench_simulate(c: &mut Criterion) {
    let (fsm, tr, _) = setup("5,7", Form::Controller);
    let channel = NoisyChannel::Bsc { p: 0.03, c: tr.c };
    let mut g = c.benchmark_group("simulate");
    g.sample_size(10);
    g.bench_function("bsc-1e6-bits", |b| {
        b.iter(|| simulate(&fsm, &channel, &SimConfig::new(1_000_000, 1)).unwrap().errors)
    });
    g.finish();
}

criterion_group!(benches, bench_closure, bench_solve, bench_simulate);
criterion_main!(benches);
