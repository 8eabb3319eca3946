use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context};
use hcfl_core::characters::{all_characters, Character, DEFAULT_CHARACTER_CAP};
use hcfl_core::curve::CurveModel;
use hcfl_core::cyclotomic::CyclotomicInteger;
use hcfl_core::jacobian::{group_law, BasePointConfig, GroupLaw, JacobianGroup};
use hcfl_core::lfun::{
    all_l_functions, change_of_variable_check, character_table_product, series_method, splitting_records, LFunction,
    LSeriesMethod, DEFAULT_PRODUCT_CAP,
};
use hcfl_core::recovery::{
    are_isomorphic_hyperelliptic, build_bundle, cross_curve_check, invert_counts, level_isomorphisms, point_classes,
    recover_point_classes, search_f3_example, twist_map, CrossCurveMap, CrossReport, LDataBundle, LevelMap,
};
use serde::Serialize;

use crate::cache::Cache;
use crate::output::{write_json, Sink, SCHEMA_VERSION};
use crate::spec::{base_from_spec, divisor_spec, CurveSpec, MapFile, PlaceSpec, TermSpec};
use crate::{Command, Common};

/// Largest deviation of |root| from q^(-n/2) accepted for the table product.
const ROOT_TOLERANCE: f64 = 1e-6;
const MAP_SEARCH_CAP: u64 = 100_000;

/// 1 for mathematical inconsistencies, 2 for everything the caller got wrong.
pub fn exit_code_of(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<hcfl_core::Error>() {
        Some(hcfl_core::Error::Inconsistent(_)) => 1,
        _ => 2,
    }
}

struct Ctx {
    law: Arc<dyn GroupLaw>,
    method: Arc<dyn LSeriesMethod>,
    cache: Cache,
    group_cap: u64,
    sink: Sink,
}

impl Ctx {
    fn group(&self, model: &CurveModel, base: &BasePointConfig, n: u32) -> anyhow::Result<JacobianGroup> {
        Ok(JacobianGroup::build(model, base, self.law.clone(), n, self.group_cap)?)
    }
}

fn load(path: &Path) -> anyhow::Result<(CurveSpec, CurveModel)> {
    let spec = CurveSpec::load(path)?;
    let model = spec.model().with_context(|| format!("curve file {}", path.display()))?;
    Ok((spec, model))
}

fn check_level(n: u32) -> anyhow::Result<()> {
    if n == 0 {
        bail!("levels start at 1");
    }
    Ok(())
}

pub fn run(common: &Common, command: Command) -> anyhow::Result<u8> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(common.workers).build()?;
    let mut ctx = Ctx {
        law: group_law(&common.law)?,
        method: series_method(&common.method)?,
        cache: Cache::new(common.cache_dir.clone(), common.no_cache),
        group_cap: common.group_cap,
        sink: Sink::default(),
    };
    if ctx.group_cap == 0 {
        bail!("--group-cap must be positive");
    }
    hcfl_core::field::set_field_size_cap(common.field_cap);
    let code = pool.install(|| dispatch(&mut ctx, command))?;
    ctx.sink.finish(common.output.as_deref())?;
    Ok(code)
}

fn dispatch(ctx: &mut Ctx, command: Command) -> anyhow::Result<u8> {
    match command {
        Command::Zeta { curve, n } => zeta(ctx, &curve, n),
        Command::Census { curve, n, max_degree } => census(ctx, &curve, n, max_degree),
        Command::Lfun { curve, n, all_chars, character, product } => lfun(ctx, &curve, n, all_chars, character, product),
        Command::Recover { curve, n, bundle, bundle_out, degree_one_only } => match (curve, bundle) {
            (Some(c), None) => recover(ctx, &c, n, bundle_out.as_deref(), degree_one_only),
            (None, Some(b)) => recover_from_bundle(ctx, &b, degree_one_only),
            _ => bail!("give exactly one of --curve and --bundle"),
        },
        Command::CrossCheck { curve, other, map, all_maps, n_max } => match map {
            Some(m) if !all_maps => cross_check(ctx, &curve, &other, &m, n_max),
            None if all_maps => cross_check_all(ctx, &curve, &other, n_max),
            _ => bail!("give exactly one of --map and --all-maps"),
        },
        Command::Twist { curve, m, n_max, curve_out, map_out, check } => {
            twist(ctx, &curve, m, n_max, curve_out.as_deref(), map_out.as_deref(), check)
        }
        Command::SearchExample { curves_dir } => search_example(ctx, curves_dir.as_deref()),
        Command::Isom { curve, other } => isom(ctx, &curve, &other),
        Command::ArtinCheck { curve, n, trunc, split_degree } => artin_check(ctx, &curve, n, trunc, split_degree),
    }
}

#[derive(Serialize)]
struct ZetaRecord<'a> {
    curve: &'a str,
    q: u64,
    genus: u32,
    level: u32,
    numerator: Vec<i128>,
    point_count: u64,
    jacobian_order: u64,
}

fn zeta(ctx: &mut Ctx, path: &Path, n: u32) -> anyhow::Result<u8> {
    check_level(n)?;
    let (_, c) = load(path)?;
    let r = ZetaRecord {
        curve: c.label(),
        q: c.q(),
        genus: c.genus(),
        level: n,
        numerator: c.level_zeta_numerator(n)?,
        point_count: c.point_count(n)?,
        jacobian_order: c.jacobian_order(n)?,
    };
    ctx.sink.emit("zeta", &r)?;
    Ok(0)
}

#[derive(Serialize)]
struct GroupRecord<'a> {
    record: &'static str,
    curve: &'a str,
    level: u32,
    d1: Vec<TermSpec>,
    invariants: &'a [u64],
    elements: Vec<&'a [u64]>,
}

#[derive(Serialize)]
struct CensusRow<'a> {
    record: &'static str,
    level: u32,
    degree: u32,
    counts: &'a [u64],
}

fn census(ctx: &mut Ctx, path: &Path, n: u32, max_degree: Option<u32>) -> anyhow::Result<u8> {
    check_level(n)?;
    let (_, c) = load(path)?;
    let base = BasePointConfig::default_for(&c)?;
    let g = ctx.group(&c, &base, n)?;
    let dmax = max_degree.unwrap_or((2 * c.genus()).saturating_sub(2));
    let table = ctx.cache.census(&c, &g, dmax)?;
    let header = GroupRecord {
        record: "group",
        curve: c.label(),
        level: n,
        d1: divisor_spec(base.divisor()),
        invariants: g.invariants(),
        elements: (0..g.order()).map(|i| g.coords(i)).collect(),
    };
    ctx.sink.emit("census", &header)?;
    for (d, counts) in table.counts.iter().enumerate() {
        ctx.sink.emit("census", &CensusRow { record: "census", level: n, degree: d as u32, counts })?;
    }
    Ok(0)
}

#[derive(Serialize)]
struct LRecord<'a> {
    record: &'static str,
    curve: &'a str,
    level: u32,
    method: &'static str,
    character: &'a [u64],
    modulus: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    coeffs: Option<&'a [CyclotomicInteger]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    numerator: Option<&'a [i128]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    denominator: Option<&'a [i128]>,
}

#[derive(Serialize)]
struct ProductRecord<'a> {
    record: &'static str,
    curve: &'a str,
    level: u32,
    group_order: u64,
    degree: usize,
    exact: bool,
    coeffs: Vec<String>,
    max_root_deviation: f64,
    roots_on_circle: bool,
}

fn lfun(
    ctx: &mut Ctx,
    path: &Path,
    n: u32,
    all_chars: bool,
    character: Option<Vec<u64>>,
    product: bool,
) -> anyhow::Result<u8> {
    check_level(n)?;
    if !all_chars && character.is_none() && !product {
        bail!("choose --all-chars, --character or --product");
    }
    let (_, c) = load(path)?;
    let base = BasePointConfig::default_for(&c)?;
    let g = ctx.group(&c, &base, n)?;
    let deg = (2 * c.genus()).saturating_sub(2);
    let table = ctx.cache.census(&c, &g, deg)?;
    let chars: Vec<Character> = match character {
        Some(exponents) => {
            if exponents.len() != g.invariants().len() || exponents.iter().zip(g.invariants()).any(|(e, d)| e >= d) {
                bail!("character {exponents:?} does not fit the invariants {:?}", g.invariants());
            }
            vec![Character { invariants: g.invariants().to_vec(), exponents }]
        }
        None if all_chars => all_characters(g.invariants(), DEFAULT_CHARACTER_CAP)?,
        None => Vec::new(),
    };
    let ls = all_l_functions(&c, &g, Some(&table), &chars, ctx.method.as_ref())?;
    for (chi, l) in chars.iter().zip(&ls) {
        let mut r = LRecord {
            record: "lfun",
            curve: c.label(),
            level: n,
            method: ctx.method.name(),
            character: &chi.exponents,
            modulus: chi.modulus(),
            coeffs: None,
            numerator: None,
            denominator: None,
        };
        match l {
            LFunction::Zeta { numerator, denominator, .. } => {
                r.numerator = Some(numerator);
                r.denominator = Some(denominator);
            }
            LFunction::Character(p) => r.coeffs = Some(&p.coeffs),
        }
        ctx.sink.emit("lfun", &r)?;
    }
    let mut code = 0;
    if product {
        let p = character_table_product(&c, &g, &table, DEFAULT_PRODUCT_CAP)?;
        let on_circle = p.max_root_deviation < ROOT_TOLERANCE;
        if !on_circle {
            code = 1;
        }
        ctx.sink.emit(
            "lfun",
            &ProductRecord {
                record: "product",
                curve: c.label(),
                level: n,
                group_order: p.group_order,
                degree: p.degree(),
                exact: p.exact,
                coeffs: p.coeffs.iter().map(|x| x.to_string()).collect(),
                max_root_deviation: p.max_root_deviation,
                roots_on_circle: on_circle,
            },
        )?;
    }
    Ok(code)
}

#[derive(Serialize)]
struct RecoverRecord<'a> {
    curve: &'a str,
    level: u32,
    group_order: u64,
    invariants: &'a [u64],
    coefficient_degree: usize,
    point_count: Option<u64>,
    recovered: &'a [Vec<u64>],
    #[serde(skip_serializing_if = "Option::is_none")]
    expected: Option<&'a [Vec<u64>]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    round_trip: Option<bool>,
    passed: bool,
}

fn recover(ctx: &mut Ctx, path: &Path, n: u32, bundle_out: Option<&Path>, degree_one_only: bool) -> anyhow::Result<u8> {
    check_level(n)?;
    let (_, c) = load(path)?;
    let base = BasePointConfig::default_for(&c)?;
    let g = ctx.group(&c, &base, n)?;
    let degree = (2 * c.genus()).saturating_sub(2).max(1);
    let table = ctx.cache.census(&c, &g, degree)?;
    let built = build_bundle(&c, &g, &table, degree)?;
    if let Some(out) = bundle_out {
        write_json(out, &built)?;
    }
    // everything below sees the bundle only as text
    let text = serde_json::to_string(&built)?;
    let mut bundle: LDataBundle = serde_json::from_str(&text)?;
    if degree_one_only {
        bundle = bundle.truncated(1);
    }
    let used = if degree_one_only { 1 } else { degree as usize };
    let mut round_trip = true;
    for d in 0..=used {
        for (x, count) in invert_counts(&bundle, d)? {
            round_trip &= table.counts[d][g.from_coords(&x)] == count;
        }
    }
    let recovered = recover_point_classes(&bundle)?;
    let expected = point_classes(&c, &g)?;
    let passed = round_trip && recovered == expected;
    let r = RecoverRecord {
        curve: c.label(),
        level: n,
        group_order: g.order() as u64,
        invariants: g.invariants(),
        coefficient_degree: used,
        point_count: Some(c.point_count(n)?),
        recovered: &recovered,
        expected: Some(&expected),
        round_trip: Some(round_trip),
        passed,
    };
    ctx.sink.emit("recover", &r)?;
    Ok(if passed { 0 } else { 1 })
}

fn recover_from_bundle(ctx: &mut Ctx, path: &Path, degree_one_only: bool) -> anyhow::Result<u8> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut bundle: LDataBundle = serde_json::from_str(&text).with_context(|| format!("parsing bundle {}", path.display()))?;
    if degree_one_only {
        bundle = bundle.truncated(1);
    }
    let recovered = recover_point_classes(&bundle)?;
    let r = RecoverRecord {
        curve: "",
        level: bundle.level,
        group_order: bundle.order(),
        invariants: &bundle.invariants,
        coefficient_degree: bundle.entries.iter().map(|e| e.coeffs.len().saturating_sub(1)).max().unwrap_or(0),
        point_count: None,
        recovered: &recovered,
        expected: None,
        round_trip: None,
        passed: true,
    };
    ctx.sink.emit("recover", &r)?;
    Ok(0)
}

#[derive(Serialize)]
struct CrossRecord<'a> {
    record: &'static str,
    curve: &'a str,
    other: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    psi: Option<&'a [LevelMap]>,
    report: &'a CrossReport,
}

fn cross_check(ctx: &mut Ctx, a: &Path, b: &Path, map: &Path, n_max: u32) -> anyhow::Result<u8> {
    check_level(n_max)?;
    let (_, c) = load(a)?;
    let (_, c2) = load(b)?;
    let file = MapFile::load(map)?;
    let base = base_from_spec(&c, &file.d1)?;
    let base2 = base_from_spec(&c2, &file.d1_prime)?;
    let report = cross_curve_check(&c, &base, &c2, &base2, ctx.law.clone(), &file.map(), n_max)?;
    ctx.sink.emit("cross-check", &CrossRecord { record: "report", curve: c.label(), other: c2.label(), psi: None, report: &report })?;
    Ok(if report.equal { 0 } else { 1 })
}

#[derive(Serialize)]
struct MapSearchSummary<'a> {
    record: &'static str,
    curve: &'a str,
    other: &'a str,
    n_max: u32,
    families_tried: usize,
    compatible: usize,
    equal_through_level_one: usize,
    equal: usize,
}

/// Every family (ψ_1, ..., ψ_nmax) of isomorphisms between the default groups.
fn cross_check_all(ctx: &mut Ctx, a: &Path, b: &Path, n_max: u32) -> anyhow::Result<u8> {
    check_level(n_max)?;
    let (_, c) = load(a)?;
    let (_, c2) = load(b)?;
    let base = BasePointConfig::default_for(&c)?;
    let base2 = BasePointConfig::default_for(&c2)?;
    let mut per_level: Vec<Vec<LevelMap>> = Vec::new();
    for n in 1..=n_max {
        per_level.push(level_isomorphisms(&ctx.group(&c, &base, n)?, &ctx.group(&c2, &base2, n)?, MAP_SEARCH_CAP)?);
    }
    let total: usize = per_level.iter().map(Vec::len).product();
    let (mut compatible, mut level_one, mut equal) = (0, 0, 0);
    for mut code in 0..total {
        let levels: Vec<LevelMap> = per_level
            .iter()
            .map(|maps| {
                let m = maps[code % maps.len()].clone();
                code /= maps.len();
                m
            })
            .collect();
        let psi = CrossCurveMap { levels };
        let report = match cross_curve_check(&c, &base, &c2, &base2, ctx.law.clone(), &psi, n_max) {
            Ok(r) => r,
            Err(hcfl_core::Error::Precondition(_)) => continue,
            Err(e) => return Err(e.into()),
        };
        compatible += 1;
        level_one += usize::from(report.levels[0].all_equal);
        equal += usize::from(report.equal);
        let rec = CrossRecord { record: "report", curve: c.label(), other: c2.label(), psi: Some(&psi.levels), report: &report };
        ctx.sink.emit("cross-check", &rec)?;
    }
    let summary = MapSearchSummary {
        record: "summary",
        curve: c.label(),
        other: c2.label(),
        n_max,
        families_tried: total,
        compatible,
        equal_through_level_one: level_one,
        equal,
    };
    ctx.sink.emit("cross-check", &summary)?;
    Ok(if equal > 0 { 0 } else { 1 })
}

#[derive(Serialize)]
struct TwistRecord<'a> {
    curve: &'a str,
    m: u32,
    twisted: &'a CurveSpec,
    map: &'a MapFile,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<&'a CrossReport>,
}

fn twist(
    ctx: &mut Ctx,
    path: &Path,
    m: u32,
    n_max: u32,
    curve_out: Option<&Path>,
    map_out: Option<&Path>,
    check: bool,
) -> anyhow::Result<u8> {
    check_level(n_max)?;
    let (_, c) = load(path)?;
    let base = BasePointConfig::default_for(&c)?;
    let (tw, base2, psi) = twist_map(&c, &base, ctx.law.clone(), m, n_max)?;
    let spec = CurveSpec::of_model(&tw);
    let file = MapFile {
        schema_version: SCHEMA_VERSION,
        d1: divisor_spec(base.divisor()),
        d1_prime: divisor_spec(base2.divisor()),
        levels: psi.levels.clone(),
    };
    if let Some(p) = curve_out {
        write_json(p, &spec)?;
    }
    if let Some(p) = map_out {
        write_json(p, &file)?;
    }
    let report = if check { Some(cross_curve_check(&c, &base, &tw, &base2, ctx.law.clone(), &psi, n_max)?) } else { None };
    ctx.sink.emit("twist", &TwistRecord { curve: c.label(), m, twisted: &spec, map: &file, report: report.as_ref() })?;
    Ok(if report.map_or(true, |r| r.equal) { 0 } else { 1 })
}

#[derive(Serialize)]
struct SurvivorRecord {
    record: &'static str,
    curve: CurveSpec,
    family: usize,
    zeta_numerator: Vec<i128>,
    point_counts: [u64; 2],
    jacobian_order: u64,
    p: PlaceSpec,
    q: PlaceSpec,
    l_data_match: bool,
}

#[derive(Serialize)]
struct SearchSummary {
    record: &'static str,
    survivors: usize,
    families: usize,
    all_match: bool,
}

fn search_example(ctx: &mut Ctx, dir: Option<&Path>) -> anyhow::Result<u8> {
    let found = search_f3_example()?;
    if let Some(d) = dir {
        std::fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
    }
    let place = |p: &hcfl_core::curve::Place| PlaceSpec { kind: p.kind, degree: p.degree, x: p.x, y: p.y };
    for (i, s) in found.iter().enumerate() {
        let mut curve = CurveSpec::of_model(&s.model);
        curve.label = format!("f3-example-{i:02}");
        if let Some(d) = dir {
            write_json(&d.join(format!("{}.json", curve.label)), &curve)?;
        }
        let r = SurvivorRecord {
            record: "survivor",
            curve,
            family: s.family,
            zeta_numerator: s.zeta_numerator.clone(),
            point_counts: [s.points_base, s.points_quadratic],
            jacobian_order: s.jacobian_order,
            p: place(&s.p),
            q: place(&s.q),
            l_data_match: s.l_data_match,
        };
        ctx.sink.emit("search-example", &r)?;
    }
    let all_match = found.iter().all(|s| s.l_data_match);
    let families = found.iter().map(|s| s.family + 1).max().unwrap_or(0);
    ctx.sink.emit("search-example", &SearchSummary { record: "summary", survivors: found.len(), families, all_match })?;
    Ok(if all_match && !found.is_empty() { 0 } else { 1 })
}

#[derive(Serialize)]
struct IsomRecord<'a> {
    curve: &'a str,
    other: &'a str,
    isomorphic: bool,
}

fn isom(ctx: &mut Ctx, a: &Path, b: &Path) -> anyhow::Result<u8> {
    let (_, c) = load(a)?;
    let (_, c2) = load(b)?;
    let isomorphic = are_isomorphic_hyperelliptic(&c, &c2)?;
    ctx.sink.emit("isom", &IsomRecord { curve: c.label(), other: c2.label(), isomorphic })?;
    Ok(0)
}

#[derive(Serialize)]
struct SplitSummary {
    degree: u32,
    places: usize,
    law_holds: bool,
}

#[derive(Serialize)]
struct ArtinRecord<'a> {
    curve: &'a str,
    level: u32,
    trunc: u32,
    series_agree: bool,
    characters_checked: usize,
    failing_characters: Vec<&'a [u64]>,
    split_degree: u32,
    splitting: Vec<SplitSummary>,
    splitting_law_holds: bool,
    passed: bool,
}

fn artin_check(ctx: &mut Ctx, path: &Path, n: u32, trunc: Option<u32>, split_degree: u32) -> anyhow::Result<u8> {
    check_level(n)?;
    let (_, c) = load(path)?;
    let base = BasePointConfig::default_for(&c)?;
    let g = ctx.group(&c, &base, n)?;
    let trunc = trunc.unwrap_or(2 * c.genus() + 2);
    let table = ctx.cache.census(&c, &g, (trunc / n).min((2 * c.genus()).saturating_sub(2)))?;
    let chars = all_characters(g.invariants(), DEFAULT_CHARACTER_CAP)?;
    let report = change_of_variable_check(&c, &g, &table, &chars, trunc)?;
    let split = splitting_records(&c, n, split_degree)?;
    let splitting: Vec<SplitSummary> = (1..=split_degree)
        .map(|d| {
            let of_degree: Vec<_> = split.iter().filter(|s| s.place_degree == d).collect();
            SplitSummary { degree: d, places: of_degree.len(), law_holds: of_degree.iter().all(|s| s.law_holds) }
        })
        .collect();
    let splitting_law_holds = report.splitting_law_holds && split.iter().all(|s| s.law_holds);
    let passed = report.passed && splitting_law_holds;
    let r = ArtinRecord {
        curve: c.label(),
        level: n,
        trunc,
        series_agree: report.passed,
        characters_checked: report.per_character.len(),
        failing_characters: report.per_character.iter().filter(|(_, ok)| !ok).map(|(e, _)| e.as_slice()).collect(),
        split_degree,
        splitting,
        splitting_law_holds,
        passed,
    };
    ctx.sink.emit("artin-check", &r)?;
    Ok(if passed { 0 } else { 1 })
}
