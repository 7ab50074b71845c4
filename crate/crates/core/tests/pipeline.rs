use cldsim::embed::DeterministicProvider;
use cldsim::graph::read_graph_file;
use cldsim::pipeline::{
    batch, compare, list_corpus, perturb_corpus, rename_all, CompareOptions, MetricId, NamedGraph,
    PerturbationPlan,
};
use cldsim::reference::limits_to_growth;

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

#[test]
fn mixed_corpus_means_follow_perturbation_strength() {
    let dir = tempfile::tempdir().unwrap();
    let r = limits_to_growth();
    perturb_corpus(&r, &PerturbationPlan::new(1), 10, dir.path()).unwrap();
    perturb_corpus(&r, &PerturbationPlan::parse_ops(2, "rename_node=1").unwrap(), 30, dir.path()).unwrap();
    for i in 0..10u64 {
        let g = rename_all(&r, 100 + i);
        std::fs::write(dir.path().join(format!("renamed-{i:02}.json")), cldsim::graph::to_json(&g)).unwrap();
    }
    let p = DeterministicProvider::new(7, 32).unwrap();
    let out = batch(&NamedGraph::new("ref", r), dir.path(), Some(&p), &CompareOptions::default(), 2).unwrap();
    assert_eq!(out.reports.len(), 50);
    for m in [MetricId::M2, MetricId::M3, MetricId::G2, MetricId::G3, MetricId::G4] {
        let group = |prefix: &str| {
            let v: Vec<f64> = out
                .reports
                .iter()
                .filter(|x| x.cmp_id.starts_with(prefix))
                .map(|x| x.get(m).unwrap())
                .collect();
            mean(&v)
        };
        let (same, light, renamed) = (group("s1-"), group("s2-"), group("renamed-"));
        assert!(same > light && light > renamed, "{m}: {same} {light} {renamed}");
    }
}

#[test]
fn batch_is_compare_mapped_over_the_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let r = limits_to_growth();
    let plan = PerturbationPlan::parse_ops(5, "add_node=2,reverse_edge=1,rename_node=1").unwrap();
    perturb_corpus(&r, &plan, 15, dir.path()).unwrap();
    let reference = NamedGraph::new("ref", r);
    let p = DeterministicProvider::new(3, 16).unwrap();
    let opts = CompareOptions::default();
    let out = batch(&reference, dir.path(), Some(&p), &opts, 3).unwrap();
    let files = list_corpus(dir.path()).unwrap();
    assert_eq!(files.len(), out.reports.len());
    for (file, report) in files.iter().zip(&out.reports) {
        let id = file.file_name().unwrap().to_str().unwrap();
        let single = compare(&reference, &NamedGraph::new(id, read_graph_file(file).unwrap()), Some(&p), &opts).unwrap();
        assert_eq!(&single, report);
    }
}
