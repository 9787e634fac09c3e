# distgraph-lab - Graph Analysis Package
