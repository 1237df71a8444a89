package com.demo.launcher;

public class Launcher {
    private Workspace workspace;
    private IconCache icons;

    public void launch(String component) {
        Intent intent = Intent.forComponent(component);
        intent.putExtras(extras);
        workspace.startActivity(intent);
        icons.touch(component);
    }



    public Drawable icon(String component) {
        Drawable d = icons.get(component);
        return d != null ? d : icons.placeholder();
    }
}
