use std::fs;

use edgemig::traces::*;

#[test]
fn cabspotting_directory_is_read_and_sorted() {
    let dir = tempfile::tempdir().unwrap();
    // the dataset stores newest fixes first
    fs::write(
        dir.path().join("new_abboip.txt"),
        "37.75134 -122.39488 0 1213084687\n37.75136 -122.39527 0 1213084659\n37.75199 -122.3946 0 1213084540\n",
    )
    .unwrap();
    fs::write(dir.path().join("new_acitva.txt"), "37.7 -122.4 1 1213080000\n").unwrap();
    fs::write(dir.path().join("_cabs.txt"), "<cab id=\"abboip\" updates=\"3\"/>\n").unwrap();
    fs::write(dir.path().join("README"), "not a trace\n").unwrap();

    let ing = read_cabspotting_dir(dir.path(), IngestOptions::default()).unwrap();
    assert_eq!(ing.files, 2);
    assert_eq!(ing.records.len(), 4);
    assert_eq!(ing.entity_count(), 2);
    assert_eq!(ing.reordered, 2);
    assert_eq!(ing.records[0].entity, "new_abboip");
    let times: Vec<i64> = ing.records[..3].iter().map(|r| r.timestamp).collect();
    assert_eq!(times, [1213084540, 1213084659, 1213084687]);
    assert_eq!((ing.records[2].lat, ing.records[2].lon), (37.75134, -122.39488));
}

#[test]
fn parse_errors_carry_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("t.txt"), "37.7 -122.4 0 1\n37.7 -122.4 0\n").unwrap();
    match read_cabspotting_dir(dir.path(), IngestOptions::default()) {
        Err(TraceError::Parse { line, path, .. }) => {
            assert_eq!(line, 2);
            assert!(path.ends_with("t.txt"));
        }
        other => panic!("unexpected {other:?}"),
    }
    let ing = read_cabspotting_dir(dir.path(), IngestOptions { skip_malformed: true }).unwrap();
    assert_eq!((ing.records.len(), ing.malformed), (1, 1));
}

#[test]
fn empty_inputs_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("empty.txt"), "").unwrap();
    assert!(matches!(read_cabspotting_dir(dir.path(), IngestOptions::default()), Err(TraceError::Empty { .. })));
    let csv = dir.path().join("empty.csv");
    fs::write(&csv, "id,timestamp,lat,lon\n").unwrap();
    assert!(matches!(read_csv(&csv, IngestOptions::default()), Err(TraceError::Empty { .. })));
}

#[test]
fn missing_directory_is_an_io_error() {
    let err = read_cabspotting_dir(std::path::Path::new("/nonexistent/traces"), IngestOptions::default()).unwrap_err();
    assert!(matches!(err, TraceError::Io { .. }));
    assert!(err.to_string().contains("/nonexistent/traces"));
}

#[test]
fn csv_traces() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    fs::write(&path, "id,timestamp,lat,lon\nb,20,37.7,-122.4\na,10,37.7,-122.4\nb,5,37.71,-122.41\n").unwrap();
    let ing = ingest(&path, TraceFormat::Csv, IngestOptions::default()).unwrap();
    let order: Vec<(&str, i64)> = ing.records.iter().map(|r| (r.entity.as_str(), r.timestamp)).collect();
    assert_eq!(order, [("a", 10), ("b", 5), ("b", 20)]);
    assert_eq!(ing.reordered, 1);

    fs::write(&path, "id,timestamp,lat,lon\na,10,37.7,-122.4\na,x,37.7,-122.4\n").unwrap();
    match read_csv(&path, IngestOptions::default()) {
        Err(TraceError::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("unexpected {other:?}"),
    }
    fs::write(&path, "id,timestamp,lat,lon\na,10,137.7,-122.4\n").unwrap();
    assert!(matches!(read_csv(&path, IngestOptions::default()), Err(TraceError::Parse { line: 2, .. })));
}
