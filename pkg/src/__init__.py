# distgraph-lab Package
