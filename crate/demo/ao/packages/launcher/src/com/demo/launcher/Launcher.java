package com.demo.launcher;

public class Launcher {
    private Workspace workspace;
    private IconCache icons;

    public void launch(String component, Bundle extras) {
        Intent intent = Intent.forComponent(component);
        intent.putExtras(extras);
        workspace.startActivity(intent);
        icons.touch(component);
    }

    public void arrange(int columns) {
        int rows = (workspace.count() + columns - 1) / columns;
        workspace.resize(columns, rows);
        workspace.relayout();
    }

    public Drawable icon(String component) {
        Drawable d = icons.get(component);
        return d != null ? d : icons.placeholder();
    }
}
