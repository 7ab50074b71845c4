//! Every example must run to completion.

macro_rules! example {
    ($name:ident) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", stringify!($name), ".rs"));
        }

        #[test]
        fn $name() {
            $name::run_example().unwrap();
        }
    };
}

example!(compare);
example!(graph_stats);
example!(embeddings);
example!(http_embed);
example!(semantic_matrix);
example!(kernels);
example!(perturb_batch);
