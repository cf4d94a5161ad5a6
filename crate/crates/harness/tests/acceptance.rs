//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits nonzero if any fails.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::future::IntoFuture;
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use quilts_core::generate::{place_links, required_link_counts};
use quilts_core::interchange::GraphFile;
use quilts_core::nodelink::barycentric_sweep_with_report;
use quilts_core::path::{replay, ClickEvent, PathError, TIME_LIMIT};
use quilts_core::record::{Outcome, TrialRecord, RECORD_SCHEMA};
use quilts_core::schedule::{build_schedule, latin_square};
use quilts_core::summary::{summarize, Factor};
use quilts_core::*;
use quilts_harness::api::{router, ErrorBody};
use quilts_harness::{stimuli, ClickReply, IssuedTrial, ManualClock, TrialService};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------- oracles

/// `floor(x + 0.5)`: half away from zero for non-negative `x`.
fn round_half_up(x: f64) -> usize {
    (x + 0.5).floor() as usize
}

fn layer_sizes(layer_of: &[usize], layers: usize) -> Vec<usize> {
    let mut s = vec![0; layers];
    for &l in layer_of {
        s[l - 1] += 1;
    }
    s
}

/// Shortest walk lengths to `dst` over reversed links.
fn distances_to(g: &LayeredGraph, dst: NodeId) -> Vec<usize> {
    let n = g.node_count();
    let mut into: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    for l in g.links() {
        into[l.dst].push(l.src);
    }
    let mut d = vec![usize::MAX; n];
    d[dst] = 0;
    let mut q = VecDeque::from([dst]);
    while let Some(v) = q.pop_front() {
        for &u in &into[v] {
            if d[u] == usize::MAX {
                d[u] = d[v] + 1;
                q.push_back(u);
            }
        }
    }
    d
}

/// Finds one simple path obeying the length and skip rules, written
/// independently of the library's search.
fn witness_path(g: &LayeredGraph, src: NodeId, dst: NodeId, min: usize, max: usize, need_skip: bool) -> Option<Vec<NodeId>> {
    let layer: Vec<usize> = (0..g.node_count()).map(|v| g.layer_of(v)).collect();
    let mut out: Vec<Vec<NodeId>> = vec![Vec::new(); g.node_count()];
    for l in g.links() {
        out[l.src].push(l.dst);
    }
    let dist = distances_to(g, dst);
    fn go(
        v: NodeId,
        path: &mut Vec<NodeId>,
        skip: bool,
        ctx: (&[Vec<NodeId>], &[usize], &[usize], NodeId, usize, usize, bool),
    ) -> bool {
        let (out, layer, dist, dst, min, max, need_skip) = ctx;
        let len = path.len() - 1;
        if v == dst {
            return len >= min && (skip || !need_skip);
        }
        for &w in &out[v] {
            if path.contains(&w) || dist[w] == usize::MAX || len + 1 + dist[w] > max {
                continue;
            }
            path.push(w);
            if go(w, path, skip || layer[w] != layer[v] + 1, ctx) {
                return true;
            }
            path.pop();
        }
        false
    }
    let mut path = vec![src];
    go(src, &mut path, false, (&out, &layer, &dist, dst, min, max, need_skip)).then_some(path)
}

/// Every simple source-to-destination path that meets the rules.
fn all_good_paths(g: &LayeredGraph, c: &PathConstraints) -> BTreeSet<Vec<NodeId>> {
    fn walk(g: &LayeredGraph, path: &mut Vec<NodeId>, c: &PathConstraints, out: &mut BTreeSet<Vec<NodeId>>) {
        let v = *path.last().unwrap();
        if v == c.destination {
            let len = path.len() - 1;
            let skip = path.windows(2).any(|w| g.layer_of(w[1]) != g.layer_of(w[0]) + 1);
            if len >= c.min_links && len <= c.max_links && (skip || !c.require_skip) {
                out.insert(path.clone());
            }
            return;
        }
        for w in 0..g.node_count() {
            if g.has_link(Link::new(v, w)) && !path.contains(&w) {
                path.push(w);
                walk(g, path, c, out);
                path.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    walk(g, &mut vec![c.source], c, &mut out);
    out
}

fn pairwise_crossings(e: &nodelink::ExpandedGraph) -> usize {
    let pos = e.positions();
    let mut c = 0;
    for (i, s) in e.segments.iter().enumerate() {
        for t in &e.segments[i + 1..] {
            if e.nodes[s.upper].layer == e.nodes[t.upper].layer {
                let a = pos[s.upper] as i64 - pos[t.upper] as i64;
                let b = pos[s.lower] as i64 - pos[t.lower] as i64;
                if a * b < 0 {
                    c += 1;
                }
            }
        }
    }
    c
}

fn random_graph(rng: &mut ChaCha8Rng, max_nodes: usize, max_layers: usize, p: f64) -> LayeredGraph {
    let layers = rng.gen_range(2..=max_layers);
    let nodes = rng.gen_range(layers..=max_nodes.max(layers));
    let mut layer_of: Vec<usize> = (1..=layers).collect();
    layer_of.extend((layers..nodes).map(|_| rng.gen_range(1..=layers)));
    let mut links = Vec::new();
    for u in 0..nodes {
        for v in 0..nodes {
            if u != v && rng.gen_bool(p) {
                links.push(Link::new(u, v));
            }
        }
    }
    LayeredGraph::new(layers, layer_of, links).unwrap()
}

/// Layered graph with a crossing-free ordering: each gap is a monotone
/// staircase over a hidden order, and node ids are shuffled within layers.
fn planar_instance(rng: &mut ChaCha8Rng) -> LayeredGraph {
    let layers = rng.gen_range(2..=5);
    let sizes: Vec<usize> = (0..layers).map(|_| rng.gen_range(3..=8)).collect();
    let mut ids: Vec<Vec<usize>> = Vec::new();
    let mut next = 0;
    for &s in &sizes {
        let mut layer: Vec<usize> = (next..next + s).collect();
        layer.shuffle(rng);
        ids.push(layer);
        next += s;
    }
    let mut layer_of = vec![0; next];
    for (k, layer) in ids.iter().enumerate() {
        for &u in layer {
            layer_of[u] = k + 1;
        }
    }
    let mut links = Vec::new();
    for k in 0..layers - 1 {
        let (mut i, mut j) = (0, 0);
        links.push(Link::new(ids[k][i], ids[k + 1][j]));
        while i + 1 < sizes[k] || j + 1 < sizes[k + 1] {
            let step = rng.gen_range(0..3);
            if (step == 0 || j + 1 == sizes[k + 1]) && i + 1 < sizes[k] {
                i += 1;
            } else if (step == 1 || i + 1 == sizes[k]) && j + 1 < sizes[k + 1] {
                j += 1;
            } else {
                i += 1;
                j += 1;
            }
            links.push(Link::new(ids[k][i], ids[k + 1][j]));
        }
    }
    links.sort();
    links.dedup();
    LayeredGraph::new(layers, layer_of, links).unwrap()
}

// ---------------------------------------------------------------- criteria

fn generator_fidelity() -> Check {
    let t0 = Instant::now();
    let mut n = 0;
    let mut attempts = 0;
    for experiment in [Experiment::Exp1, Experiment::Exp2] {
        for spec in experiment.treatments() {
            for seed in 0..5u64 {
                let s = stimuli::stimulus(&spec, seed).map_err(|e| format!("{} seed {seed}: {e}", spec.label()))?;
                let g = &s.graph;
                let layers = spec.layers;
                let sizes = layer_sizes(g.layer_assignment(), layers);
                ensure(g.node_count() == spec.nodes && sizes.iter().all(|&k| k > 0), || {
                    format!("{}: bad layer sizes {sizes:?}", spec.label())
                })?;
                let possible: usize = sizes.windows(2).map(|w| w[0] * w[1]).sum();
                let want_proper = round_half_up(spec.link_density * possible as f64);
                let want_skip = round_half_up(spec.skip_density * want_proper as f64);
                let proper = g
                    .links()
                    .iter()
                    .filter(|l| g.layer_of(l.dst) == g.layer_of(l.src) + 1)
                    .count();
                let skip = g.links().len() - proper;
                ensure((proper, skip) == (want_proper, want_skip), || {
                    format!("{} seed {seed}: {proper}/{skip} links, want {want_proper}/{want_skip}", spec.label())
                })?;
                ensure(g.layer_of(s.source) == 1 && g.layer_of(s.destination) == layers, || {
                    format!("{} seed {seed}: endpoints in wrong layers", spec.label())
                })?;
                let (max, need_skip) = match experiment {
                    Experiment::Exp1 => (layers - 2, true),
                    Experiment::Exp2 => (3 * layers / 2, false),
                };
                ensure(witness_path(g, s.source, s.destination, 3, max, need_skip).is_some(), || {
                    format!("{} seed {seed}: no good path found by the oracle", spec.label())
                })?;
                n += 1;
                attempts += s.attempts;
            }
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    ensure(secs < 300.0, || format!("took {secs:.1} s"))?;
    Ok(format!("{n} stimuli verified, {attempts} attempts, {secs:.1} s"))
}

fn density_arithmetic() -> Check {
    let mut notes = Vec::new();
    for (d, want) in [(0.25, 100), (0.50, 200)] {
        let spec = TreatmentSpec {
            nodes: 40,
            layers: 2,
            link_density: d,
            skip_density: 0.0,
            experiment: Experiment::Exp2,
        };
        ensure(required_link_counts(&spec, 400).0 == want, || format!("d={d}: count rule"))?;
        // 20 + 20 nodes: 400 possible proper links
        let layer_of: Vec<usize> = (0..40).map(|i| 1 + i / 20).collect();
        let links = place_links(&spec, 2, &layer_of, &mut ChaCha8Rng::seed_from_u64(9)).map_err(|e| e.to_string())?;
        ensure(links.len() == want, || format!("d={d}: placed {}", links.len()))?;
        notes.push(format!("{d} -> {want}"));
    }
    Ok(notes.join(", "))
}

fn compactness() -> Check {
    let spec = TreatmentSpec {
        nodes: 100,
        layers: 10,
        link_density: 0.25,
        skip_density: 0.25,
        experiment: Experiment::Exp1,
    };
    let layer_of: Vec<usize> = (0..100).map(|i| 1 + i % 10).collect();
    let (mut area, mut lin) = (0.0f64, 0.0f64);
    for seed in 0..20 {
        let links = place_links(&spec, 10, &layer_of, &mut ChaCha8Rng::seed_from_u64(seed)).map_err(|e| e.to_string())?;
        let g = LayeredGraph::new(10, layer_of.clone(), links).map_err(|e| e.to_string())?;
        let q = layout_quilt(&g, SkipDepiction::Mixed, 8.0).map_err(|e| e.to_string())?;
        let m = layout_centered_matrix(&g, 8.0).map_err(|e| e.to_string())?;
        area = area.max(q.width * q.height / (m.width * m.height));
        lin = lin.max((q.width / m.width).max(q.height / m.height));
    }
    ensure(area <= 0.45 && lin <= 0.6, || format!("worst area ratio {area:.3}, worst side ratio {lin:.3}"))?;
    Ok(format!("worst area ratio {area:.3}, worst side ratio {lin:.3}"))
}

fn crossing_counter() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut total = 0;
    for i in 0..50 {
        let (a, b) = (rng.gen_range(1..=8), rng.gen_range(1..=8));
        let layer_of: Vec<usize> = (0..a + b).map(|v| if v < a { 1 } else { 2 }).collect();
        let mut pairs: Vec<Link> = (0..a).flat_map(|u| (a..a + b).map(move |v| Link::new(u, v))).collect();
        pairs.shuffle(&mut rng);
        pairs.truncate(rng.gen_range(0..=30.min(pairs.len())));
        let g = LayeredGraph::new(2, layer_of, pairs).unwrap();
        let mut e = insert_dummy_nodes(&g);
        for layer in e.order.iter_mut() {
            layer.shuffle(&mut rng);
        }
        let (got, want) = (count_crossings(&e), pairwise_crossings(&e));
        ensure(got == want, || format!("instance {i}: {got} vs oracle {want}"))?;
        total += want;
    }
    Ok(format!("50 instances agree ({total} crossings in all)"))
}

fn sweeps() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..100 {
        let g = random_graph(&mut rng, 30, 6, 0.12);
        let e = insert_dummy_nodes(&g);
        let (out, r) = barycentric_sweep_with_report(&e, 10);
        let mono = r.history.windows(2).all(|w| w[1] <= w[0]) && r.history.first().is_none_or(|&h| h <= r.initial);
        ensure(mono && count_crossings(&out) == r.best && r.best <= r.initial, || {
            format!("random instance {i}: history {:?} from {}", r.history, r.initial)
        })?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut recovered = 0;
    let mut left = Vec::new();
    for _ in 0..50 {
        let g = planar_instance(&mut rng);
        let e = insert_dummy_nodes(&g);
        let (out, r) = barycentric_sweep_with_report(&e, 10);
        ensure(r.history.windows(2).all(|w| w[1] <= w[0]), || "non-monotone history".into())?;
        match count_crossings(&out) {
            0 => recovered += 1,
            c => left.push(c),
        }
    }
    let msg = format!("monotone on 150 instances; {recovered}/50 planar orders recovered (residual crossings {left:?})");
    ensure(recovered >= 45, || msg.clone())?;
    Ok(msg)
}

fn chain(links: &[Link], from: NodeId, to: NodeId) -> Option<Vec<NodeId>> {
    let mut path = vec![from];
    let mut left = links.to_vec();
    while let Some(i) = left.iter().position(|l| l.src == *path.last().unwrap()) {
        let l = left.swap_remove(i);
        if path.contains(&l.dst) {
            return None;
        }
        path.push(l.dst);
    }
    (left.is_empty() && *path.last().unwrap() == to && path.len() > 1).then_some(path)
}

fn path_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let (mut completed, mut clicks) = (0, 0);
    for gi in 0..100 {
        let g = Arc::new(random_graph(&mut rng, 12, 5, 0.3));
        let n = g.node_count();
        let source = rng.gen_range(0..n);
        let destination = (source + rng.gen_range(1..n)) % n;
        let min_links = rng.gen_range(1..=3);
        let c = PathConstraints {
            min_links,
            max_links: min_links + rng.gen_range(0..=4),
            require_skip: rng.gen_bool(0.5),
            source,
            destination,
        };
        let good = all_good_paths(&g, &c);
        let target: Option<Vec<NodeId>> = good.iter().nth(rng.gen_range(0..good.len().max(1))).cloned();
        let mut state = PathState::new(g.clone(), c, Duration::ZERO);
        let mut events = Vec::new();
        for step in 1..=60u64 {
            let element = if let (Some(t), true) = (&target, rng.gen_bool(0.6)) {
                let tip = *state.forward_fringe().last().unwrap();
                match t.iter().position(|&v| v == tip).filter(|&i| i + 1 < t.len()) {
                    Some(i) if rng.gen_bool(0.5) => ElementId::Node(t[i + 1]),
                    Some(i) => ElementId::Link(Link::new(t[i], t[i + 1])),
                    None => ElementId::Node(rng.gen_range(0..n)),
                }
            } else if rng.gen_bool(0.5) && !g.links().is_empty() {
                ElementId::Link(*g.links().choose(&mut rng).unwrap())
            } else {
                let lit: Vec<ElementId> = state.highlight().into_iter().collect();
                lit.choose(&mut rng).copied().unwrap_or(ElementId::Node(rng.gen_range(0..=n)))
            };
            let at = Duration::from_millis(step * 100);
            events.push(ClickEvent { element, at });
            let r = state.click(element, at);
            clicks += 1;
            let links: Vec<Link> = state
                .highlight()
                .into_iter()
                .filter_map(|e| match e {
                    ElementId::Link(l) => Some(l),
                    ElementId::Node(_) => None,
                })
                .collect();
            let shown = chain(&links, c.source, c.destination);
            let oracle = shown.as_ref().is_some_and(|p| good.contains(p));
            let done = matches!(r, Ok(ClickResult::Completed { .. }));
            ensure(done == oracle, || format!("graph {gi} click {step}: engine {done}, oracle {oracle}"))?;
            if done {
                let p = shown.unwrap();
                let path: Vec<Link> = p.windows(2).map(|w| Link::new(w[0], w[1])).collect();
                ensure(is_good_path(&g, &path, &c) == Ok(true), || format!("graph {gi}: completed path fails is_good_path"))?;
                completed += 1;
                break;
            }
        }
        let (again, _) = replay(g.clone(), c, Duration::ZERO, &events);
        ensure(again.status() == state.status(), || format!("graph {gi}: replay differs"))?;
    }
    ensure(completed >= 30, || format!("only {completed} completions"))?;
    Ok(format!("100 graphs, {clicks} clicks, {completed} completions, all verdicts agree"))
}

async fn timeout_over_http() -> Check {
    let g = Arc::new(LayeredGraph::new(3, vec![1, 2, 3], vec![Link::new(0, 1), Link::new(1, 2)]).unwrap());
    let c = PathConstraints {
        min_links: 2,
        max_links: 2,
        require_skip: false,
        source: 0,
        destination: 2,
    };
    let mut p = PathState::new(g.clone(), c, Duration::ZERO);
    p.tick(Duration::from_micros(239_999_999));
    ensure(p.status() == Status::Active, || "active at 239.999999 s".into())?;
    let mut p = PathState::new(g, c, Duration::ZERO);
    ensure(p.click(ElementId::Node(1), TIME_LIMIT) == Err(PathError::TimedOut), || "no timeout at 240 s".into())?;

    let clock = Arc::new(ManualClock::new(Duration::from_secs(5)));
    let schedule = build_schedule(Experiment::Exp1, 1, 3).map_err(|e| e.to_string())?;
    let service = Arc::new(TrialService::new(schedule, clock.clone()));
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.map_err(|e| e.to_string())?;
    let base = format!("http://{}", listener.local_addr().unwrap());
    tokio::spawn(axum::serve(listener, router(service.clone())).into_future());
    let http = reqwest::Client::new();
    let err = |e: reqwest::Error| e.to_string();

    let trial: IssuedTrial = http
        .get(format!("{base}/api/participants/0/next"))
        .send()
        .await
        .map_err(err)?
        .json()
        .await
        .map_err(err)?;
    let click = |el: String| {
        http.post(format!("{base}/api/trials/{}/click", trial.cell.trial_id))
            .json(&serde_json::json!({ "element": el }))
            .send()
    };
    let node = format!("n{}", trial.destination);
    clock.advance(Duration::from_millis(239_999));
    let r = click(node.clone()).await.map_err(err)?;
    ensure(r.status() == 200, || format!("239.999 s click got {}", r.status()))?;
    let reply: ClickReply = r.json().await.map_err(err)?;
    ensure(reply.elapsed_ms == 239_999, || "elapsed".into())?;
    clock.advance(Duration::from_millis(1));
    let r = click(node).await.map_err(err)?;
    ensure(r.status() == 409, || format!("240 s click got {}", r.status()))?;
    let body: ErrorBody = r.json().await.map_err(err)?;
    ensure(body.error == "timed-out", || body.error.clone())?;
    let recs = service.records();
    ensure(recs.len() == 1 && recs[0].outcome == Outcome::TimedOut && recs[0].accuracy == 0, || {
        format!("records {recs:?}")
    })?;
    Ok("239.999 s accepted, 240 s timed out over HTTP, accuracy 0 recorded".into())
}

fn determinism() -> Check {
    let spec = TreatmentSpec {
        nodes: 100,
        layers: 5,
        link_density: 0.25,
        skip_density: 0.25,
        experiment: Experiment::Exp2,
    };
    let run = || -> Result<Vec<String>, String> {
        let s = stimuli::stimulus(&spec, 42).map_err(|e| e.to_string())?;
        let mut out = vec![GraphFile::from_stimulus(&s).to_json()];
        let markers = Some(Markers {
            source: s.source,
            destination: s.destination,
        });
        for d in Depiction::ALL {
            let b = stimuli::bundle_for(&s.graph, d, spec.experiment, markers).map_err(|e| e.to_string())?;
            out.push(b.to_json());
            let opts = RenderOptions {
                highlight: [ElementId::Node(s.source)].into(),
                ..RenderOptions::default()
            };
            out.push(render(&b, &opts).map_err(|e| e.to_string())?);
        }
        Ok(out)
    };
    ensure(run()? == run()?, || "in-process outputs differ".into())?;

    // and across two processes of the CLI
    let exe = env!("CARGO_BIN_EXE_quilts");
    let tmp = std::env::temp_dir().join(format!("quilts-accept-{}", std::process::id()));
    let mut files = Vec::new();
    for r in 0..2 {
        let dir = tmp.join(r.to_string());
        let sh = |args: &[&str]| -> Result<(), String> {
            let st = Command::new(exe).args(args).output().map_err(|e| e.to_string())?;
            ensure(st.status.success(), || String::from_utf8_lossy(&st.stderr).into_owned())
        };
        let d = dir.to_str().unwrap();
        sh(&["generate", "--experiment", "exp1", "--seed", "5", "--out", d, "--nodes", "50", "--layers", "10", "--links", "0.5", "--skips", "0.25"])?;
        let graph = format!("{d}/n50-l10-d50-s25-exp1-s5.json");
        let bundle = format!("{d}/b.json");
        sh(&["layout", "--graph", &graph, "--depiction", "quilt-text", "--out", &bundle])?;
        sh(&["render", "--bundle", &bundle, "--highlight", "n0,n1", "--out", &format!("{d}/o.svg")])?;
        let mut bytes = Vec::new();
        for f in [graph.as_str(), bundle.as_str(), &format!("{d}/o.svg")] {
            bytes.push(std::fs::read(f).map_err(|e| e.to_string())?);
        }
        files.push(bytes);
    }
    let _ = std::fs::remove_dir_all(&tmp);
    ensure(files[0] == files[1], || "CLI outputs differ between runs".into())?;
    Ok("graph file, 5 bundles and 5 SVGs identical in-process; CLI graph/bundle/SVG identical across processes".into())
}

fn schedule_shape() -> Check {
    for (experiment, people, per, sessions) in [(Experiment::Exp1, 18, 216, 2), (Experiment::Exp2, 24, 72, 1)] {
        let s = build_schedule(experiment, people, 1).map_err(|e| e.to_string())?;
        let n = experiment.treatments().len();
        let mut perms: BTreeMap<Vec<Depiction>, usize> = BTreeMap::new();
        for p in &s.participants {
            ensure(p.trials.len() == per, || format!("{experiment}: {} trials", p.trials.len()))?;
            for session in 0..sessions {
                let cells: BTreeSet<(Depiction, usize)> = p
                    .trials
                    .iter()
                    .filter(|t| t.session == session)
                    .map(|t| (t.depiction, t.treatment))
                    .collect();
                ensure(cells.len() == 3 * n, || format!("{experiment}: session {session} repeats a cell"))?;
            }
            *perms.entry(p.depiction_order.clone()).or_default() += 1;
        }
        let (lo, hi) = (perms.values().min().unwrap(), perms.values().max().unwrap());
        ensure(perms.len() == 6 && hi - lo <= 1, || format!("{experiment}: permutation counts {perms:?}"))?;
        let sq = latin_square(n);
        let full: BTreeSet<usize> = (0..n).collect();
        for i in 0..n {
            ensure(sq[i].iter().copied().collect::<BTreeSet<_>>() == full, || format!("row {i}"))?;
            ensure(sq.iter().map(|r| r[i]).collect::<BTreeSet<_>>() == full, || format!("column {i}"))?;
        }
    }
    Ok("Exp1 216 trials x 18 participants, Exp2 72 x 24, permutations 3/4 each, Latin squares valid".into())
}

fn summary() -> Check {
    let rec = |participant: usize, depiction: Depiction, nodes: usize, secs: u64, accuracy: u8| TrialRecord {
        schema: RECORD_SCHEMA,
        participant,
        trial_index: 0,
        trial_id: format!("p{participant}-t0"),
        session: 0,
        practice: false,
        depiction,
        spec: TreatmentSpec {
            nodes,
            layers: 5,
            link_density: 0.25,
            skip_density: 0.0,
            experiment: Experiment::Exp2,
        },
        seed: 0,
        source: 0,
        destination: 1,
        outcome: if accuracy == 1 { Outcome::Completed } else { Outcome::TimedOut },
        elapsed_ms: secs * 1000,
        accuracy,
        clicks: Vec::new(),
    };
    let q = Depiction::Quilt(SkipDepiction::Mixed);
    let m = Depiction::CenteredMatrix;
    let log = vec![rec(0, q, 50, 10, 1), rec(0, q, 100, 20, 0), rec(1, q, 50, 30, 1), rec(1, m, 50, 40, 1)];
    let rows = summarize(&log).map_err(|e| e.to_string())?;
    // participant means, then mean and sd/sqrt(n) across participants
    let want: [(&[Factor], &[&str], usize, f64, f64, f64, f64); 5] = [
        (&[Factor::Depiction], &["quilt-mixed"], 2, 22.5, 7.5, 0.75, 0.25),
        (&[Factor::Depiction], &["matrix"], 1, 40.0, 0.0, 1.0, 0.0),
        (&[Factor::Nodes], &["50"], 2, 22.5, 12.5, 1.0, 0.0),
        (&[Factor::Nodes], &["100"], 1, 20.0, 0.0, 0.0, 0.0),
        (&[Factor::Depiction, Factor::Nodes], &["quilt-mixed", "50"], 2, 20.0, 10.0, 1.0, 0.0),
    ];
    let close = |a: f64, b: f64| if b == 0.0 { a.abs() < 1e-12 } else { ((a - b) / b).abs() <= 1e-9 };
    for (factors, levels, n, t, tse, a, ase) in want {
        let row = rows
            .iter()
            .find(|r| r.factors == factors && r.levels.iter().map(String::as_str).eq(levels.iter().copied()))
            .ok_or_else(|| format!("missing row {levels:?}"))?;
        let ok = row.n == n
            && close(row.time_mean_s, t)
            && close(row.time_se_s, tse)
            && close(row.accuracy_mean, a)
            && close(row.accuracy_se, ase);
        ensure(ok, || format!("{levels:?}: got {row:?}"))?;
    }
    let mut with_practice = log.clone();
    with_practice.push(TrialRecord {
        practice: true,
        ..rec(0, m, 50, 999, 0)
    });
    ensure(summarize(&with_practice).map_err(|e| e.to_string())? == rows, || "practice trial counted".into())?;
    Ok("5 hand-computed cells match to 1e-9; practice trials excluded".into())
}

fn main() -> ExitCode {
    let rt = tokio::runtime::Runtime::new().expect("runtime");
    let results: Vec<(&str, Check)> = vec![
        ("generator fidelity", generator_fidelity()),
        ("density arithmetic", density_arithmetic()),
        ("compactness", compactness()),
        ("crossing counter", crossing_counter()),
        ("barycentric sweeps", sweeps()),
        ("path-engine oracle", path_oracle()),
        ("timeout", rt.block_on(timeout_over_http())),
        ("determinism", determinism()),
        ("schedule shape", schedule_shape()),
        ("summarize", summary()),
    ];
    let mut failed = 0;
    for (name, r) in &results {
        match r {
            Ok(msg) => println!("PASS  {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL  {name}: {msg}");
            }
        }
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
