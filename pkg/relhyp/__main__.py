from relhyp.main import main

raise SystemExit(main())
