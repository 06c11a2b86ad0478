use hybrid_bfs::harness::{run_benchmark, BenchConfig};
use hybrid_bfs::{bfs_reference, CsrGraph, Direction, EdgeList, GraphParams, Mode, UNREACHED};

#[test]
fn edge_dump_round_trip() {
    let params = GraphParams::new(8, 8, 42);
    let edges = hybrid_bfs::generator::generate(params).unwrap();
    let mut buf = Vec::new();
    edges.write_to(&mut buf).unwrap();
    assert_eq!(&buf[..8], b"HBFSEDG1");
    assert_eq!(buf.len(), 8 + 4 + 4 + 8 + 8 + 16 * edges.len());
    let back = EdgeList::read_from(buf.as_slice()).unwrap();
    assert_eq!(back.edges, edges.edges);
    assert_eq!(back.num_vertices, edges.num_vertices);

    let g = CsrGraph::build(&edges).unwrap();
    let h = CsrGraph::build(&back).unwrap();
    assert_eq!(g.row_starts(), h.row_starts());
    assert_eq!(g.adjacency(), h.adjacency());
}

#[test]
fn truncated_dump_is_rejected() {
    let edges = hybrid_bfs::generator::generate(GraphParams::new(6, 4, 3)).unwrap();
    let mut buf = Vec::new();
    edges.write_to(&mut buf).unwrap();
    buf.truncate(buf.len() - 5);
    assert!(EdgeList::read_from(buf.as_slice()).is_err());
    assert!(EdgeList::read_from(&b"NOTADUMP"[..]).is_err());
}

#[test]
fn report_and_trace_csv() {
    let mut cfg = BenchConfig::new(GraphParams::new(11, 16, 5), Mode::SimdHybrid);
    cfg.runs = 8;
    let report = run_benchmark(&cfg).unwrap();
    assert!(report.all_valid());

    let mut out = Vec::new();
    report.write_csv(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "source,seconds,teps,valid");
    assert_eq!(lines.len(), 1 + 8);
    for (line, run) in lines[1..].iter().zip(&report.runs) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 4);
        assert_eq!(cols[0].parse::<u32>().unwrap(), run.source);
        assert_eq!(cols[3], "true");
    }

    let mut out = Vec::new();
    report.write_trace_csv(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("layer,direction,kernel,v_f,e_f,e_u,f,g,seconds,fallbacks,gathers"));
    let rows: usize = report.runs.iter().map(|r| r.trace.len()).sum();
    assert_eq!(lines.count(), rows);
}

#[test]
fn traces_follow_the_frontier() {
    let params = GraphParams::new(12, 16, 9);
    let g = CsrGraph::build(&hybrid_bfs::generator::generate(params).unwrap()).unwrap();
    let mut cfg = BenchConfig::new(params, Mode::ScalarHybrid);
    cfg.runs = 4;
    let report = hybrid_bfs::harness::run_on_graph(&g, &cfg).unwrap();
    for run in &report.runs {
        let (_, depths) = bfs_reference(&g, run.source).unwrap();
        let mut per_level = vec![0u64; run.trace.len() + 1];
        for &d in depths.iter().filter(|&&d| d != UNREACHED) {
            per_level[d as usize] += 1;
        }
        let mut current = Direction::TopDown;
        for (i, row) in run.trace.iter().enumerate() {
            assert_eq!(row.layer as usize, i + 1);
            assert_eq!(row.v_f, per_level[i], "layer {}", row.layer);
            if row.v_f > row.f_value {
                current = Direction::BottomUp;
            } else if row.v_f < row.g_value {
                current = Direction::TopDown;
            }
            assert_eq!(row.direction, current, "layer {}", row.layer);
        }
        assert_eq!(per_level[run.trace.len()], 0);
    }
}
